# chains/__init__.py
