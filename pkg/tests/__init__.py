# Tetrad Tests Module
