def line_dist(n):
    return [[abs(i - j) for j in range(n)] for i in range(n)]
