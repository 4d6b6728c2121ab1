# Тесты MasseyLab
