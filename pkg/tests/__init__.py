import os
import unittest

def my_module_suite():
    loader = unittest.TestLoader()
    here = os.path.dirname(os.path.abspath(__file__))
    suite = loader.discover(here, top_level_dir=os.path.dirname(here))
    return suite
