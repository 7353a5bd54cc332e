"""Test-suite root; its presence puts this directory on sys.path so the
tests can import the shared `helpers` module."""
