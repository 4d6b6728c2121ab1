# Бюджеты, исключения и вспомогательные функции
