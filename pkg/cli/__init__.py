# markovgf command line
