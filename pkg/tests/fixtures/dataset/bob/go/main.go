// created by bob
package main
import ("bufio";"fmt";"os")
func main(){
	r:=bufio.NewReader(os.Stdin)
	var n,x,s int
	fmt.Fscan(r,&n)
	for i:=0;i<n;i++{fmt.Fscan(r,&x);s+=x}
	fmt.Println(s)
}
