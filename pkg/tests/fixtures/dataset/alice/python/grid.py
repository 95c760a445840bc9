# Author: alice
def count_islands(grid):
    """Count 4-connected islands of '#'."""
    seen = set()
    islands = 0
    for row_index, row in enumerate(grid):
        for col_index, cell in enumerate(row):
            if cell != "#" or (row_index, col_index) in seen:
                continue
            islands += 1
            stack = [(row_index, col_index)]
            while stack:
                r, c = stack.pop()
                if (r, c) in seen:
                    continue
                seen.add((r, c))
                for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    nr, nc = r + dr, c + dc
                    if 0 <= nr < len(grid) and 0 <= nc < len(row) and grid[nr][nc] == "#":
                        stack.append((nr, nc))
    return islands
