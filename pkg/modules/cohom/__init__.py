# Модуль когомологий конечных групп
