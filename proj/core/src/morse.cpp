namespace renorm {}
