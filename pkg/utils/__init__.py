"""Utils package for the Borel map analyzer"""
