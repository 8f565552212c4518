# -*- coding: utf-8 -*-
#
# spanoracle documentation build configuration file.

import os
import sys
sys.path.insert(0, os.path.abspath(".."))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.todo',
    'sphinx.ext.viewcode',
    'sphinx.ext.githubpages',
]

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'spanoracle'
copyright = u'2026, spanoracle developers'
author = u'spanoracle developers'

version = u'0.1'
release = u'0.1'

language = None

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'

todo_include_todos = True

html_theme = 'alabaster'

html_static_path = ['_static']

htmlhelp_basename = 'spanoracledoc'

latex_documents = [
    (master_doc, 'spanoracle.tex', u'spanoracle Documentation',
     author, 'manual'),
]

man_pages = [
    (master_doc, 'spanoracle', u'spanoracle Documentation',
     [author], 1)
]

texinfo_documents = [
    (master_doc, 'spanoracle', u'spanoracle Documentation',
     author, 'spanoracle', 'Exact distance oracles for long shortest paths.',
     'Miscellaneous'),
]

epub_title = project
epub_author = author
epub_publisher = author
epub_copyright = copyright

epub_exclude_files = ['search.html']
