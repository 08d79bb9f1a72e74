"""
Test suite for the quekno package
"""
