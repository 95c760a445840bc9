// Author: alice
package main

import "fmt"

func main() {
	var total, value int
	for {
		if _, err := fmt.Scan(&value); err != nil {
			break
		}
		total += value
	}
	fmt.Println(total)
}
