"""
When imported, this module loads the package defaults for a run from the YAML file named by the 'VIF_DEFAULTS'
environment variable, or from the defaults.yaml shipped with the package
"""
import os
import yaml

bundled_path = os.path.join(os.path.dirname(__file__), 'defaults.yaml')
path = os.environ.get('VIF_DEFAULTS', bundled_path)
with open(path, 'r') as f:
    defaults_info = yaml.safe_load(f)
