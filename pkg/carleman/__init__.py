"""Carleman weight sequences and the asymptotic Borel map"""
