# -*- coding: utf-8 -*-
#
# floqeels documentation build configuration file.
#
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

import floqeels  # noqa: E402

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'floqeels'
copyright = '2024, floqeels developers'
version = floqeels.__version__
release = floqeels.__version__

exclude_patterns = []
pygments_style = 'sphinx'
todo_include_todos = True

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'floqeelsdoc'

latex_documents = [
    ('index', 'floqeels.tex', 'floqeels Documentation',
     'floqeels developers', 'manual'),
]

man_pages = [
    ('index', 'floqeels', 'floqeels Documentation',
     ['floqeels developers'], 1)
]

autodoc_member_order = 'groupwise'
