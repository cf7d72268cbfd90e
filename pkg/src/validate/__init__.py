# validate package
