# -*- coding: utf-8 -*-
#
# flatgen documentation build configuration file
#
# This file is execfile()d with the current directory set to its containing dir.

import sys
import os

on_rtd = os.environ.get('READTHEDOCS', None) == 'True'


def get_version():
    with open('../flatgen/__init__.py') as f:
        for line in f:
            if line.startswith('__version__'):
                return line.split('=')[-1].strip().strip("'\"")


sys.path.insert(0, os.path.abspath('modules'))
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration -----------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.viewcode',
    'sphinx.ext.inheritance_diagram',
    'sphinx.ext.intersphinx',
]

autosummary_generate = True

inheritance_graph_attrs = dict(rankdir="LR", size='""', fontsize=24, ratio='expand')

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'flatgen'
copyright = u'2026, Ph. Guglielmetti, https://github.com/goulu/flatgen'

autodoc_member_order = 'bysource'
autoclass_content = 'both'

autodoc_default_options = {
    'members': True,
    'undoc-members': True,
    'show-inheritance': True,
}


def autodoc_skip_member(app, what, name, obj, skip, options):
    exclusions = ('__weakref__', '__subclasshook__',
                  '__doc__', '__module__', '__dict__',
                  )
    exclude = name in exclusions
    return skip or exclude


def setup(app):
    app.connect('autodoc-skip-member', autodoc_skip_member)


version = get_version()
release = version

exclude_patterns = ['_build']
add_function_parentheses = True
pygments_style = 'sphinx'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'scipy': ('https://docs.scipy.org/doc/scipy', None),
    'pint': ('https://pint.readthedocs.io/en/stable', None),
}

# -- Options for HTML output ---------------------------------------------------

if on_rtd:
    html_theme = 'default'
else:
    html_theme = 'sphinxdoc'

html_static_path = ['_static']
html_last_updated_fmt = '%b %d, %Y'
html_domain_indices = True
html_use_index = True
html_show_sourcelink = True
htmlhelp_basename = 'flatgendoc'

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
    ('index', 'flatgen.tex', u'flatgen Documentation',
     u'Ph. Guglielmetti, https://github.com/goulu/flatgen', 'manual'),
]

man_pages = [
    ('index', 'flatgen', u'flatgen Documentation',
     [u'Ph. Guglielmetti, https://github.com/goulu/flatgen'], 1)
]
