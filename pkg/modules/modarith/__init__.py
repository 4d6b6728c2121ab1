# Модуль модульной арифметики и линейной алгебры над Z/m
