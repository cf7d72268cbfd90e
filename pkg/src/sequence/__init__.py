# sequence package
