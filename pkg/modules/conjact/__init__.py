# Модуль действия на классах сопряжённости
