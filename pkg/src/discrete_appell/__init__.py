"""Discrete analogues of the Appell function F1 and their identity catalogues."""
