"""Satisfiability, translation and trace evaluation for PPTL over separation logic."""
