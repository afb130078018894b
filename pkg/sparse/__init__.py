# Sparse package
