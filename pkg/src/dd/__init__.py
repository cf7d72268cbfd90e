# dd package
