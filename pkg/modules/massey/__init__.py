# Модуль произведений Масси
