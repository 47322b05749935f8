# Test package for scatterlab
