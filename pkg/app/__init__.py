# Fatorações K1AK2
