# Tetrad Optimization Module
# Contains the lambda root solver, feasibility gate and asymptotic limits
