import os
import sys

# let test modules import the shared oracle helpers as plain modules
sys.path.insert(0, os.path.dirname(__file__))
