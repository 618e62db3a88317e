# Django management commands package.
