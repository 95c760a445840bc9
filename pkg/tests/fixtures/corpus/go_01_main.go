package main

import (
	"bufio"
	"fmt"
	"os"
	"sort"
)

// readInts reads n integers from the reader.
func readInts(r *bufio.Reader, n int) []int {
	out := make([]int, n)
	for i := range out {
		fmt.Fscan(r, &out[i])
	}
	return out
}

func main() {
	reader := bufio.NewReader(os.Stdin)
	var n int
	fmt.Fscan(reader, &n)
	xs := readInts(reader, n)
	sort.Ints(xs)
	if len(xs) == 0 {
		return
	}
	fmt.Println(xs[0], xs[len(xs)-1])
}
