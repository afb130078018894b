# Spaces package
