import os
import sys

# Add source code directory to path (required for autodoc)
sys.path.insert(0, os.path.abspath('..'))

from conetorsion import __version__  # noqa: E402


# -- General configuration ---------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.imgmath',
    'sphinx.ext.intersphinx',
    'sphinx.ext.napoleon',
]

autodoc_default_options = {'members': True, 'show-inheritance': True}

# Google-style docstrings
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_use_ivar = True
napoleon_use_param = True
napoleon_use_rtype = True

imgmath_latex_preamble = r'\usepackage{amsmath}\usepackage{amssymb}'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
    'mpmath': ('https://mpmath.org/doc/current/', None),
}

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']


# -- Project-specific configuration ------------------------------------
project = 'Conetorsion'
copyright = "2026, Measurement Engineering Group"

release = __version__
version = '.'.join(release.split('.')[:3])

today_fmt = '%Y-%m-%d'

# -- Options for HTML output -------------------------------------------

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'conetorsiondoc'


# -- Options for LaTeX output ------------------------------------------

latex_engine = 'pdflatex'

latex_elements = {
    'papersize': 'a4paper',
    'preamble': r'\usepackage{amssymb}',
}

latex_documents = [
    ('index', 'conetorsion.tex',
     'conetorsion Documentation',
     'Measurement Engineering Group', 'manual'),
]
