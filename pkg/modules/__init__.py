# Вычислительные модули MasseyLab
