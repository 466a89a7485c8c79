# Sphinx configuration of the meanharmonic documentation.

import os
import sys
import re
sys.path.insert(0, os.path.abspath('..'))

project = 'meanharmonic'
copyright = '2022-present, VAWVAW'
author = 'VAWVAW'

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
]

templates_path = ['_templates']
source_suffix = ".rst"
master_doc = "index"

with open('../meanharmonic/__init__.py') as f:
    version = re.search(r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]', f.read(), re.MULTILINE).group(1)
release = version

exclude_patterns = ['_build']

# key construction is internal to the cache
autodoc_default_options = {
    'members': True,
    'undoc-members': True,
    'exclude-members': "make_key",
    'autoclass_content': 'both',
}
autodoc_typehints = 'description'

pygments_style = 'friendly'
html_theme = 'alabaster'
html_static_path = ['_static']
