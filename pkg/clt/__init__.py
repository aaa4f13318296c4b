# Cross Length Transfer package initialization
