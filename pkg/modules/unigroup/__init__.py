# Модуль унитреугольных групп
