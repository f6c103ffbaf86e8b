"""
properad-htt v0.1 Test Suite
"""
