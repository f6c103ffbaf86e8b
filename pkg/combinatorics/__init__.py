"""
Graph combinatorics: flag graphs, contractions, canonical forms, contraction
trees and exhaustive catalogs of small graphs.
"""
