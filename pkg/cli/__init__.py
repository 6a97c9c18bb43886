# Tetrad CLI Module
# Contains the record schema, sweep tabulation and the argparse commands
