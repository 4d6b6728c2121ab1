# Загрузка и разбор файлов задач
