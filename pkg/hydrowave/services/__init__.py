"""Services Package - numerical and symbolic building blocks"""
