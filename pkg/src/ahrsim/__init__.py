"""Simulator of the AHR heterarchical parallel LISP machine."""
