# Модуль формулы для неразветвлённой группы Брауэра
