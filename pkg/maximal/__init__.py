# Maximal package
