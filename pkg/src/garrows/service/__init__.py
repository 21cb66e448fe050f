"""HTTP front end over the same workflows the command line uses."""
