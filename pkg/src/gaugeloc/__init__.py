"""gaugeloc - exact discrete audits of locality for Abelian gauge theories on cubical spacetimes."""

__version__ = "0.1.0"
