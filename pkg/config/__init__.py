# Настройки и схема файлов задач
