# tomography package
