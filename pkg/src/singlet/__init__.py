# singlet package
