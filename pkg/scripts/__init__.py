# Tetrad Scripts Module
