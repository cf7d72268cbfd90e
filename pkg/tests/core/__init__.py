# Test package for core utilities
