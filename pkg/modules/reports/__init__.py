# JSON-отчёты и табличный вывод
