# Lorentz package
