import sys
from collections import defaultdict


def solve(n, edges):
    """Count connected components."""
    graph = defaultdict(list)
    for a, b in edges:
        graph[a].append(b)
        graph[b].append(a)
    seen = set()
    comps = 0
    for v in range(n):
        if v in seen:
            continue
        comps += 1
        stack = [v]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(graph[u])
    return comps


def main():
    data = sys.stdin.readline().split()
    n, m = int(data[0]), int(data[1])
    edges = [tuple(map(int, sys.stdin.readline().split())) for _ in range(m)]
    print(solve(n, edges))


if __name__ == "__main__":
    main()
