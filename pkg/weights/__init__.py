# Weights package
