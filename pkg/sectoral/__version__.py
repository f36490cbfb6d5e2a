"""
Metadata for sectoral-nk
"""
__title__ = "sectoral-nk"
__description__ = "Two-sector New-Keynesian models: perturbation solutions, Ramsey policy, optimal simple rules and estimation"
__url__ = "https://github.com/sectoral-nk/sectoral-nk"
__version__ = "1.0.0"
__author__ = "The sectoral-nk Authors"
__author_email__ = "maintainers@sectoral-nk.org"
__license__ = "Apache 2.0"
__copyright__ = "Copyright 2024 The sectoral-nk Authors. All Rights Reserved."
